count = 79
steps = 0
while count > 1:
    count = count // 2
    steps += 1
print("steps:", steps)
