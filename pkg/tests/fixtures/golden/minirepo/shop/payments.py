from shop.config import CURRENCY, TIMEOUT_SECONDS


class PaymentGateway:
    def __init__(self, client):
        self.client = client

    def charge(self, amount):
        return self.client.post("/charge", amount=amount, currency=CURRENCY, timeout=TIMEOUT_SECONDS)

    def refund(self, charge_id):
        return self.client.post("/refund", charge_id=charge_id, timeout=TIMEOUT_SECONDS)
