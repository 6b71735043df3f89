"""Thin client for the modbot service.

By default the client hosts the service in-process (no server needed);
pass a base URL to talk to a remote instance instead. Either way the
caller sees (status_code, parsed JSON body) pairs.
"""


class ServiceClient:
    """Synchronous HTTP client over the service API."""

    def __init__(self, server: str | None = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                # The in-process test client is a supported transport
                # here, not a migration hazard; keep stderr clean.
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service.app import create_app

            self._client = TestClient(create_app())

    def close(self):
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @staticmethod
    def _result(response) -> tuple[int, dict]:
        return response.status_code, response.json()

    def health(self) -> tuple[int, dict]:
        return self._result(self._client.get("/health"))

    def list_gaits(self) -> tuple[int, dict]:
        return self._result(self._client.get("/gaits"))

    def get_gait(self, name: str) -> tuple[int, dict]:
        return self._result(self._client.get(f"/gaits/{name}"))

    def parse_catalog(self, content: str) -> tuple[int, dict]:
        return self._result(
            self._client.post("/gaits/parse", json={"content": content})
        )

    def simulate(self, request: dict) -> tuple[int, dict]:
        return self._result(self._client.post("/simulate", json=request))
