# 统一的 JSON 响应封装
from typing import Any, Dict, Optional

from fastapi.responses import JSONResponse

from app.utils.errors import WorkbenchError
from app.utils.linalg import to_jsonable


def create_response(
    success: bool,
    code: int,
    message: str,
    data: Optional[Any] = None,
    pagination: Optional[Dict[str, Any]] = None,
    status_code: int = 200
) -> JSONResponse:
    """
    通用响应函数

    data 中的 numpy 数组、复数与 NaN 会先转换为 JSON 可表示的形式。

    Args:
        success: 成功标志
        code: 响应码
        message: 响应消息
        data: 可选的数据负载（可为null）
        pagination: 可选的分页信息（可为null）
        status_code: HTTP 状态码

    Returns:
        标准化格式的JSONResponse
    """
    envelope = {
        "success": success,
        "code": code,
        "message": message,
        "data": to_jsonable(data),
        "pagination": pagination,
    }
    return JSONResponse(content=envelope, status_code=status_code)


def success_response(message: str = "操作成功", data: Optional[Any] = None) -> JSONResponse:
    """成功响应辅助函数"""
    return create_response(success=True, code=200, message=message, data=data)


def error_response(
    code: int,
    message: str,
    data: Optional[Any] = None,
    status_code: int = 400
) -> JSONResponse:
    """
    错误响应辅助函数

    Args:
        code: 错误码（见 app.utils.errors）
        message: 错误消息
        data: 可选的错误数据
        status_code: HTTP 状态码

    Returns:
        错误格式的JSONResponse
    """
    return create_response(success=False, code=code, message=message, data=data, status_code=status_code)


def workbench_error_response(exc: WorkbenchError) -> JSONResponse:
    """工作台异常：4xxx 映射为 422，5xxx 映射为 500，witness 放入 data"""
    status_code = 422 if exc.code < 5000 else 500
    return error_response(code=exc.code, message=exc.message, data=exc.to_dict(), status_code=status_code)
