def prod_to(n):
    if n <= 1:
        return 1
    return n * prod_to(n - 1)

for k in range(5):
    print(k, prod_to(k))
