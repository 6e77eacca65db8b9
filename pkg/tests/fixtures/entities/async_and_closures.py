async def fetch(url):
    async def inner():
        return url

    return await inner()


def outer():
    def helper():
        def deeper():
            return 0
        return deeper()
    return helper()
