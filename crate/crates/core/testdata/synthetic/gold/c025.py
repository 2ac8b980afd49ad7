height = 41
steps = 0
while height > 1:
    height = height // 2
    steps += 1
print("steps:", steps)
