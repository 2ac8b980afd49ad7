values = [16, 57, 7, 1, 24, 17]
big = []
for x in values:
    if x > 34:
        big.append(x)
print(len(big), "above 34")
