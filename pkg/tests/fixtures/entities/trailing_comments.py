def first():
    x = 1
    return x
    # trailing comment is not part of the body


# between definitions
def second(): return 2  # same-line body
