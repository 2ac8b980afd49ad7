def find_largest(ages):
    best = ages[0]
    for x in ages:
        if x > best:
            best = x
    return best

print(find_largest([70, 74, 47, 68, 48, 56]))
