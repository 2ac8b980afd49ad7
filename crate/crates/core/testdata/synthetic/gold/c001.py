def show_score(items):
    score = 0
    for x in items:
        score = score + x
    return score

items = [23, 13, 43]
print(show_score(items))
