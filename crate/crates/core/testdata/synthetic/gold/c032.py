marks = [75, 60, 15, 59, 65, 92, 90]
big = []
for x in marks:
    if x > 48:
        big.append(x)
print(len(big), "above 48")
