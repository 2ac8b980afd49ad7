def safe_divide(a, b):
    try:
        size = a / b
    except ZeroDivisionError:
        print("cannot divide by zero")
        size = None
    return size

print(safe_divide(35, 4))
