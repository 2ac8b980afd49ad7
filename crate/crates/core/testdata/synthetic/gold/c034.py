def check_count(marks):
    count = 0
    for x in marks:
        count = count + x
    return count

marks = [19, 4, 4, 2, 35, 3, 21, 50, 46]
print(check_count(marks))
