words = ['apple', 'date', 'kiwi', 'lime']
lengths = {}
for w in words:
    lengths[w] = len(w)
for key in lengths:
    print(key, lengths[key])
