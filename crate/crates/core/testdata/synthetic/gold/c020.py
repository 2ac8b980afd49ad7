def safe_divide(a, b):
    try:
        count = a / b
    except ZeroDivisionError:
        print("cannot divide by zero")
        count = None
    return count

print(safe_divide(85, 4))
