def show_acc(marks):
    acc = 0
    for x in marks:
        acc = acc + x
    return acc

marks = [25, 16, 1, 26]
print(show_acc(marks))
