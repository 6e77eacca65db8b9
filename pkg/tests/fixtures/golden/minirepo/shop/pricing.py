"""Price helpers."""


def apply_discount(price, percent):
    discount = price * percent / 100
    return price - discount


def round_price(value):
    """Half-even rounding to cents."""
    return round(value, 2)


class TaxTable:
    def __init__(self, rates):
        self.rates = dict(rates)

    def rate_for(self, region):
        return self.rates.get(region, 0.0)
