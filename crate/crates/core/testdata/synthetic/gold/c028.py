class Counter:
    def __init__(self):
        self.height = 0

    def add(self, amount):
        self.height += amount
        return self.height

obj = Counter()
obj.add(3)
print(obj.height)
