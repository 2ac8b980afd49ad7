def build_largest(scores):
    best = scores[0]
    for x in scores:
        if x > best:
            best = x
    return best

print(build_largest([11, 29, 55, 95, 88, 29, 67]))
