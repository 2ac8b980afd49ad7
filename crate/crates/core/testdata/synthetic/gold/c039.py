class Counter:
    def __init__(self):
        self.total = 0

    def add(self, amount):
        self.total += amount
        return self.total

obj = Counter()
obj.add(2)
print(obj.total)
