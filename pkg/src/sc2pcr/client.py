"""Thin HTTP client used by the CLI.

Talks to a remote service when a base URL is configured (``--server`` flag
or ``SC2_SERVER``); otherwise routes requests through the in-process ASGI
app, so the CLI works standalone while still exercising the same HTTP
surface as any other client.
"""

from __future__ import annotations

import asyncio
import os

import httpx


class ServiceError(Exception):
    """Non-2xx response from the service."""

    def __init__(self, status_code: int, detail):
        self.status_code = status_code
        self.detail = detail
        super().__init__(f"service returned {status_code}: {detail}")


class ServiceClient:
    def __init__(self, server: str | None = None):
        self.server = server or os.environ.get("SC2_SERVER") or None

    def post(self, path: str, payload: dict) -> dict:
        if self.server:
            response = httpx.post(
                self.server.rstrip("/") + path, json=payload, timeout=None
            )
        else:
            response = asyncio.run(self._post_in_process(path, payload))
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ServiceError(response.status_code, detail)
        return response.json()

    async def _post_in_process(self, path: str, payload: dict) -> httpx.Response:
        from .service.app import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://sc2pcr.local", timeout=None
        ) as client:
            return await client.post(path, json=payload)
