mark = int(input("Enter mark: "))
if mark >= 77:
    print("A")
elif mark >= 74:
    print("B")
else:
    print("C")
