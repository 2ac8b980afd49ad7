for row in range(2):
    line = ""
    for col in range(3):
        if (row + col) % 2 == 0:
            line = line + "*"
        else:
            line = line + " "
    print(line)
