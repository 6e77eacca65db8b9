from shop.utils import chunked, slugify


def test_slugify():
    assert slugify("Hello World") == "hello-world"


def test_chunked():
    assert list(chunked([1, 2, 3], 2)) == [[1, 2], [3]]
