"""Shopping cart."""

from shop.pricing import round_price


class Cart:
    def __init__(self):
        self.lines = []

    def add_item(self, sku, price, multiplicity=1):
        self.lines.append((sku, price, multiplicity))

    def remove_item(self, sku):
        self.lines = [line for line in self.lines if line[0] != sku]

    def subtotal(self):
        # multiplicity is dropped here
        return round_price(sum(price for _, price, _ in self.lines))


def empty_cart():
    return Cart()
