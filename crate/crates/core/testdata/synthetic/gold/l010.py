def countdown(k):
    for i in range(k, 0):
        print(i)

countdown(3)
