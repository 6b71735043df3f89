"""Optional MQTT pass-through bridge.

When MODBOT_MQTT_HOST (and optionally MODBOT_MQTT_PORT) are set, every
payload published by the simulated transport is mirrored to a real MQTT
broker on the same topics. The simulation never depends on the bridge;
it is a tap for observing runs with standard MQTT tooling.
"""

import os

from .errors import BridgeError

MQTT_HOST_ENV = "MODBOT_MQTT_HOST"
MQTT_PORT_ENV = "MODBOT_MQTT_PORT"
DEFAULT_MQTT_PORT = 1883


class MqttBridge:
    """Mirrors simulated publishes to a broker via paho-mqtt."""

    def __init__(self, host: str, port: int = DEFAULT_MQTT_PORT, client=None):
        if client is None:
            try:
                import paho.mqtt.client as mqtt
            except ImportError:
                raise BridgeError(
                    "MQTT bridge requested but paho-mqtt is not installed; "
                    "install the 'mqtt' extra"
                ) from None
            client = mqtt.Client()
        self.host = host
        self.port = port
        self._client = client
        self._client.connect(host, port)

    def publish(self, topic: str, payload: bytes):
        self._client.publish(topic, payload)

    def close(self):
        disconnect = getattr(self._client, "disconnect", None)
        if disconnect is not None:
            disconnect()


def bridge_from_env(environ=None, client=None) -> MqttBridge | None:
    """Build a bridge from MODBOT_MQTT_HOST/MODBOT_MQTT_PORT, or None
    when no host is configured."""
    env = os.environ if environ is None else environ
    host = env.get(MQTT_HOST_ENV)
    if not host:
        return None
    port_raw = env.get(MQTT_PORT_ENV, str(DEFAULT_MQTT_PORT))
    try:
        port = int(port_raw)
    except ValueError:
        raise BridgeError(f"{MQTT_PORT_ENV} must be an integer, got {port_raw!r}") from None
    return MqttBridge(host, port, client=client)
