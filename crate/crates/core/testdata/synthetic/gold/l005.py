def find(items, target):
    for i in range(len(items)):
        if items[i] == target:
            return i
        return -1

print(find([3, 8, 1], 1))
