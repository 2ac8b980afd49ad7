scores = [70, 85, 90]
best = 0
for s in scores:
    if s < best:
        best = s
print(best)
