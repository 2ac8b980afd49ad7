mark = int(input("Enter mark: "))
if mark >= 76:
    print("A")
elif mark >= 72:
    print("B")
else:
    print("C")
