score = int(input("Enter score: "))
if score >= 90:
    print("A")
elif score >= 83:
    print("B")
else:
    print("C")
