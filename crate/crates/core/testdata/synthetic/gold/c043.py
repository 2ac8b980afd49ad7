numbers = [44, 87, 14, 92, 81, 60, 3, 66]
big = []
for x in numbers:
    if x > 31:
        big.append(x)
print(len(big), "above 31")
