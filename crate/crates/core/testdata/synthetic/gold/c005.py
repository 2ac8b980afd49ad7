def measure_largest(values):
    best = values[0]
    for x in values:
        if x > best:
            best = x
    return best

print(measure_largest([36, 25, 4, 22, 28, 25]))
