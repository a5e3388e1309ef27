"""Typed client for the HTTP service, in-process by default.

``ServiceClient()`` serves every request by invoking the application
directly, with no socket or separate process involved; passing a base URL
talks to a running server instead. Either way the error envelope produced
by the service is decoded back into this package's exception types, so
callers handle one error surface regardless of transport.
"""

from __future__ import annotations

import asyncio
from typing import Any, Mapping

import httpx

from . import errors
from .errors import QfcsimError, ValidationError

IN_PROCESS_BASE_URL = "http://qfcsim.local"


class InProcessTransport(httpx.BaseTransport):
    """Serve httpx requests by running an ASGI app on a private event loop."""

    def __init__(self, app: Any) -> None:
        self._transport = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        # The ASGI transport is async-only; re-wrap the fully read body so the
        # request stream satisfies both sync and async interfaces.
        content = request.read()
        async_request = httpx.Request(
            request.method, request.url, headers=request.headers, content=content
        )

        async def call() -> httpx.Response:
            response = await self._transport.handle_async_request(async_request)
            body = b"".join([chunk async for chunk in response.stream])
            return httpx.Response(
                response.status_code, headers=response.headers, content=body
            )

        return asyncio.run(call())


def _rebuild_exception(detail: Mapping[str, Any]) -> QfcsimError:
    """Reconstruct a typed exception from a service error envelope."""
    name = detail.get("type", "")
    message = detail.get("message", "unspecified error")
    cls = getattr(errors, name, None)
    if cls is None or not (isinstance(cls, type) and issubclass(cls, QfcsimError)):
        return ValidationError(message)
    if cls is errors.DataFormatError:
        return errors.DataFormatError(
            detail.get("source", "input"), list(detail.get("problems", [message]))
        )
    if cls is errors.ContrastExceedsReflectionError:
        return errors.ContrastExceedsReflectionError(
            detail.get("would_be_alpha_per_cm", float("nan"))
        )
    if cls is errors.QuadratureError:
        return errors.QuadratureError(
            detail.get("partial_estimate", float("nan")),
            detail.get("rel_change", float("nan")),
        )
    if cls is errors.IntegrationError:
        prev, last = detail.get("last_two_endpoints", ((), ()))
        return errors.IntegrationError((tuple(prev), tuple(last)))
    return cls(message)


def _format_request_validation(detail: Any) -> str:
    """Flatten FastAPI's request-validation report into one message."""
    if isinstance(detail, list):
        parts = []
        for item in detail:
            loc = ".".join(str(piece) for piece in item.get("loc", []))
            parts.append(f"{loc}: {item.get('msg', 'invalid')}" if loc else item.get("msg", "invalid"))
        return "; ".join(parts) if parts else "invalid request"
    return str(detail)


class ServiceClient:
    """Thin wrapper: JSON in, JSON out, typed exceptions on failure."""

    def __init__(self, base_url: str | None = None, timeout: float = 120.0) -> None:
        if base_url is None:
            from .service import create_app

            self._client = httpx.Client(
                transport=InProcessTransport(create_app()),
                base_url=IN_PROCESS_BASE_URL,
                timeout=None,
            )
        else:
            self._client = httpx.Client(base_url=base_url, timeout=timeout)

    def get(self, path: str) -> dict:
        return self._decode(self._send("GET", path, None))

    def post(self, path: str, payload: Mapping[str, Any]) -> dict:
        return self._decode(self._send("POST", path, payload))

    def _send(self, method: str, path: str, payload: Mapping[str, Any] | None) -> httpx.Response:
        try:
            if method == "GET":
                return self._client.get(path)
            return self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise ValidationError(f"cannot reach server: {exc}") from exc

    @staticmethod
    def _decode(response: httpx.Response) -> dict:
        if response.is_success:
            return response.json()
        try:
            body = response.json()
        except ValueError:
            body = {}
        if isinstance(body, dict) and isinstance(body.get("error"), dict):
            raise _rebuild_exception(body["error"])
        if isinstance(body, dict) and "detail" in body:
            raise ValidationError(_format_request_validation(body["detail"]))
        raise ValidationError(
            f"server returned status {response.status_code}: {response.text[:200]}"
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()
