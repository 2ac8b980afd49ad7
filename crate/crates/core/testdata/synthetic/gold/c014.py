value = 70
steps = 0
while value > 1:
    value = value // 4
    steps += 1
print("steps:", steps)
