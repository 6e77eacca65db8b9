def broken(:
    return 1


class Fine:
    pass
