numbers = [46, 5, 92, 55, 38, 8]
big = []
for x in numbers:
    if x > 46:
        big.append(x)
print(len(big), "above 46")
