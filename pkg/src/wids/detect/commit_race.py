"""Commit rejection race detection.

An attacker who wants a client to abandon or downgrade its SAE handshake
spoofs the AP's rejection - status 77 (unsupported finite cyclic group) or
status 1 (unspecified failure) - racing just ahead of the AP's genuine
reply.  The resulting wire signature is impossible for an honest AP: a
rejection to a client immediately followed by a success to the same client.
A rejection with no success inside race_window is just a rejection.

The alert is anchored at the success frame: that is the packet proving the
rejection was forged.

Repeated forged unsupported-group rejections against one client, with the
rejected group getting weaker each time, are additionally reported as a
group downgrade: the attacker is steering the client down to a weak group
it will accept.
"""

from __future__ import annotations

from ..frames import (
    SAE_GROUP_MODULUS_BITS,
    STATUS_SUCCESS,
    STATUS_UNSPECIFIED_FAILURE,
    STATUS_UNSUPPORTED_GROUP,
    AuthBody,
    FrameRecord,
    is_connection_request,
)
from .alerts import Alert, AlertKind
from .config import DetectorConfig

_REJECTION_KINDS = {
    STATUS_UNSUPPORTED_GROUP: AlertKind.GROUP_UNSUPPORTED,
    STATUS_UNSPECIFIED_FAILURE: AlertKind.COMMIT_OUT_OF_RANGE,
}


class CommitRaceDetector:
    def __init__(self, cfg: DetectorConfig):
        self.cfg = cfg
        self._pending: dict[str, tuple[int, int, int]] = {}  # client -> ts, status, frame
        self._last_commit_group: dict[str, int | None] = {}
        self._last_rejected: dict[str, tuple[int, int]] = {}  # client -> strength, frame
        self.race_total = 0

    def on_frame(self, frame: FrameRecord) -> list[Alert]:
        body = frame.body
        if not isinstance(body, AuthBody):
            return []
        ap = self.cfg.protected_bssid
        if is_connection_request(frame, ap):
            self._last_commit_group[frame.source_addr] = body.sae_group
            return []
        if frame.source_addr != ap or frame.receiver_addr in (None, ap):
            return []
        client = frame.receiver_addr
        if body.status_code in _REJECTION_KINDS:
            self._pending[client] = (frame.ts_us, body.status_code, frame.frame_number)
            return []
        if body.status_code != STATUS_SUCCESS:
            return []
        pending = self._pending.pop(client, None)
        if pending is None:
            return []
        rej_ts, rej_status, rej_frame = pending
        if frame.ts_us - rej_ts > self.cfg.race_window:
            return []  # legitimate rejection, the success is unrelated
        self.race_total += 1
        kind = _REJECTION_KINDS[rej_status]
        alerts = [Alert(
            kind=kind,
            detected_at_us=frame.ts_us,
            victim_addrs=(client,),
            evidence_frames=(rej_frame, frame.frame_number),
            detail=f"spoofed rejection (status {rej_status:#06x}) raced a "
                   "genuine success reply to the same client",
        )]
        if kind is AlertKind.GROUP_UNSUPPORTED:
            downgrade = self._track_downgrade(client, frame)
            if downgrade is not None:
                alerts.append(downgrade)
        return alerts

    def _track_downgrade(self, client: str, success: FrameRecord) -> Alert | None:
        group = self._last_commit_group.get(client)
        strength = SAE_GROUP_MODULUS_BITS.get(group) if group is not None else None
        previous = self._last_rejected.get(client)
        if strength is None:
            self._last_rejected.pop(client, None)
            return None
        self._last_rejected[client] = (strength, success.frame_number)
        if previous is None or strength >= previous[0]:
            return None
        return Alert(
            kind=AlertKind.GROUP_DOWNGRADE,
            detected_at_us=success.ts_us,
            victim_addrs=(client,),
            evidence_frames=(previous[1], success.frame_number),
            detail=f"repeated forged group rejections with strictly "
                   f"decreasing group strength ({previous[0]} -> {strength} bits)",
        )
