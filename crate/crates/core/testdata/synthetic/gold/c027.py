def show_largest(numbers):
    best = numbers[0]
    for x in numbers:
        if x > best:
            best = x
    return best

print(show_largest([28, 15, 12, 54, 67, 59]))
