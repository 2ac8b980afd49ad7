def safe_divide(a, b):
    try:
        score = a / b
    except ZeroDivisionError:
        print("cannot divide by zero")
        score = None
    return score

print(safe_divide(86, 4))
