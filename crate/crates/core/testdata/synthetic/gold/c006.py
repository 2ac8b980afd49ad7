class Timer:
    def __init__(self):
        self.result = 0

    def add(self, amount):
        self.result += amount
        return self.result

obj = Timer()
obj.add(4)
print(obj.result)
