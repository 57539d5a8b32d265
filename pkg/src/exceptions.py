"""
Exceptions Module

Các lỗi dùng chung cho toàn bộ package. Lỗi về dữ liệu đầu vào kế thừa
ValueError (giữ cách kiểm tra `pytest.raises(ValueError, match=...)`),
lỗi do vi phạm điều kiện trong các phép dựng mô hình kế thừa RuntimeError.
"""

from typing import Optional


class TriguardError(Exception):
    """Base class cho mọi lỗi của triguard"""


class SignatureError(TriguardError, ValueError):
    """Signature khai báo không hợp lệ"""


class FormulaSyntaxError(TriguardError, ValueError):
    """Lỗi cú pháp khi parse công thức, kèm vị trí"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UndeclaredSymbolError(TriguardError, ValueError):
    """Ký hiệu chưa được khai báo trong signature"""


class ArityError(TriguardError, ValueError):
    """Số đối số không khớp với arity đã khai báo"""


class FragmentError(TriguardError, ValueError):
    """Công thức không thuộc fragment yêu cầu"""


class NotASentenceError(TriguardError, ValueError):
    """Công thức còn biến tự do"""


class StructureError(TriguardError, ValueError):
    """Structure hoặc phần tử không hợp lệ"""


class ConstructionError(TriguardError, RuntimeError):
    """Điều kiện của một phép dựng bị vi phạm (thường là lỗi ở bước trước)"""


class SaturationError(ConstructionError):
    """Vi phạm điều kiện trong quá trình U-saturation"""


class GridError(ConstructionError):
    """Vi phạm điều kiện khi dựng lưới D hoặc mô hình A'"""


class TypeMismatchError(TriguardError, ValueError):
    """Type không có dạng yêu cầu (vd. 2-type không guarded hoặc degenerate)"""


class InputError(TriguardError, ValueError):
    """File đầu vào không đọc/parse được (thông báo kèm tên file)"""
