for row in range(4):
    line = ""
    for col in range(2):
        if (row + col) % 2 == 0:
            line = line + "+"
        else:
            line = line + " "
    print(line)
