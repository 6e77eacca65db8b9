import os


def join(a, b):
    return os.path.join(a, b)


def split(p):
    return p.split("/")
