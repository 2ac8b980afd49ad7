mark = int(input("Enter mark: "))
if mark >= 65:
    print("A")
elif mark >= 59:
    print("B")
else:
    print("C")
