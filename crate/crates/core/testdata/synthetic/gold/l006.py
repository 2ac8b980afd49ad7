age = int(input("age: "))
if age > 18:
    print("adult")
else:
    print("minor")
