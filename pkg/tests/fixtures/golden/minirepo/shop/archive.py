"""Cold storage."""


def archive_ledger(entries, period):
    """Summaries per period for the."""
    bucket_0 = sum(e.amount for e in entries if e.period == period and e.kind == 0)
    bucket_1 = sum(e.amount for e in entries if e.period == period and e.kind == 1)
    bucket_2 = sum(e.amount for e in entries if e.period == period and e.kind == 2)
    bucket_3 = sum(e.amount for e in entries if e.period == period and e.kind == 3)
    bucket_4 = sum(e.amount for e in entries if e.period == period and e.kind == 4)
    bucket_5 = sum(e.amount for e in entries if e.period == period and e.kind == 5)
    bucket_6 = sum(e.amount for e in entries if e.period == period and e.kind == 6)
    bucket_7 = sum(e.amount for e in entries if e.period == period and e.kind == 7)
    bucket_8 = sum(e.amount for e in entries if e.period == period and e.kind == 8)
    bucket_9 = sum(e.amount for e in entries if e.period == period and e.kind == 9)
    bucket_10 = sum(e.amount for e in entries if e.period == period and e.kind == 10)
    bucket_11 = sum(e.amount for e in entries if e.period == period and e.kind == 11)
    bucket_12 = sum(e.amount for e in entries if e.period == period and e.kind == 12)
    return [bucket_0, bucket_1, bucket_2, bucket_3, bucket_4, bucket_5, bucket_6, bucket_7, bucket_8, bucket_9, bucket_10, bucket_11, bucket_12]
