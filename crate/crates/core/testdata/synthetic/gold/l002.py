total = 0
for i in range(1, 10):
    total = total + i
print("sum of 1 to 10 is", total)
