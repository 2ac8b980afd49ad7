score = 52
steps = 0
while score > 1:
    score = score // 6
    steps += 1
print("steps:", steps)
