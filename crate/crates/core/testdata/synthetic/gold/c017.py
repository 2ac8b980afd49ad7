class Timer:
    def __init__(self):
        self.height = 0

    def add(self, amount):
        self.height += amount
        return self.height

obj = Timer()
obj.add(9)
print(obj.height)
