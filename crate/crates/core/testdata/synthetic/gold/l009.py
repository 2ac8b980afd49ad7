count = 0
for word in ["a", "bb", "ccc"]:
    count = len(word)
print(count)
