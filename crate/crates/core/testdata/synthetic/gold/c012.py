def build_result(marks):
    result = 0
    for x in marks:
        result = result + x
    return result

marks = [40, 21, 28, 36, 30, 24]
print(build_result(marks))
