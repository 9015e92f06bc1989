"""列挙の上限値"""

ENUMERATION_CAP = 10**6
GROUP_ORDER_CAP = 10**4
FIELD_SIZE_CAP = 2**20
EXTENSION_DEGREE_CAP = 24


class CapExceededError(ValueError):
    """設定された上限を超えた時に送出"""


def check_cap(size: int, cap: int, what: str) -> None:
    """上限値の検査

    Parameters
    ----------
    size : int
        大きさ
    cap : int
        上限
    what : str
        エラーメッセージに使う対象の名前

    Raises
    ------
    CapExceededError
        上限を超えた時に送出
    """
    if size > cap:
        msg = f"{what} of size {size} exceeds the cap {cap}"
        raise CapExceededError(msg)
