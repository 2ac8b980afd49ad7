def total_price(prices):
    for p in prices:
        total = 0
        total = total + p
    return total

print(total_price([1, 2, 3]))
