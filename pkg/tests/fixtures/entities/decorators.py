import functools


def deco(fn):
    return fn


@deco
@functools.lru_cache(maxsize=None)
def cached(x):
    return x * 2


@deco
class Service:
    @staticmethod
    def make():
        return Service()

    @property
    def name(self):
        return "svc"
