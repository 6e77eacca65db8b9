class Parser(
    object,
):
    def parse(
        self,
        text,
        strict=False,
    ):
        if strict:
            raise ValueError(text)
        return text.split()
