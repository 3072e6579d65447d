"""Run Dark DAO scripts: ordered protocol calls with bound results and expected failures.

A string argument "$name" refers to the result bound by an earlier step's
"as"; "$name.field" and "$name.0" reach into a bound mapping or list.
"""

import logging
from typing import Any

from app.config import settings
from app.core.darkdao import DarkDao
from app.core.ledger import Ledger, Wallet
from app.core.lite import LiteContract, enumeration_attack, place_bid
from app.core.security import SignatureScheme
from app.models.darkdao import Message, MintAuthorization, Restriction, SelectionPolicy
from app.models.ledger import InclusionProof, TxStatus
from app.schemas.darkdao import DarkDaoScript, MessageIn, RestrictionIn, ScriptStep
from app.utils.exceptions import (
    NotFoundException,
    ScriptExpectationError,
    ValidationException,
    VBELabException,
)
from app.utils.rng import DeterministicRNG

logger = logging.getLogger(__name__)


class ScriptRunner:
    def __init__(self, script: DarkDaoScript, seed: int | None = None):
        self.script = script
        self.seed = seed if seed is not None else (script.seed if script.seed is not None else settings.default_seed)
        self.rng = DeterministicRNG(self.seed)
        self.scheme = SignatureScheme()
        self.variables: dict[str, Any] = {}
        self.wallets: dict[str, Wallet] = {}
        self._encrypted: dict[str, str] = {}
        self.ledger: Ledger | None = None
        self.lite: LiteContract | None = None
        self.dao: DarkDao | None = None

        if script.protocol == "basic":
            self.dao = DarkDao(self.scheme, self.rng.fork("darkdao"))
        else:
            self.ledger = Ledger(self.scheme, fee=script.fee)
            self.lite = LiteContract(
                self.ledger,
                self.rng.fork("lite"),
                lockup=script.lockup,
                policy=script.policy,
            )
            for name in sorted(script.balances):
                wallet = Wallet.create(self.ledger, self.rng.fork(f"wallet:{name}"))
                self.wallets[name] = wallet
                for asset, amount in sorted(script.balances[name].items()):
                    self.ledger.mint(wallet.address, asset, amount)
            if script.fee > 0:
                self.ledger.mint(self.lite.gas_address, self.ledger.native_asset, 1_000_000.0)
            self.ledger.produce_block([])

    # Reference resolution

    def resolve(self, value: Any) -> Any:
        if isinstance(value, str) and value.startswith("$"):
            name, *path = value[1:].split(".")
            if name not in self.variables:
                raise ValidationException(f"unbound variable ${name}")
            resolved = self.variables[name]
            for key in path:
                if isinstance(resolved, list) and key.isdigit() and int(key) < len(resolved):
                    resolved = resolved[int(key)]
                elif isinstance(resolved, dict) and key in resolved:
                    resolved = resolved[key]
                else:
                    raise ValidationException(f"{value} does not resolve")
            return resolved
        if isinstance(value, list):
            return [self.resolve(v) for v in value]
        if isinstance(value, dict):
            return {k: self.resolve(v) for k, v in value.items()}
        return value

    def run(self) -> dict:
        results = []
        failure = None
        for index, step in enumerate(self.script.steps):
            outcome = self._run_step(index, step)
            results.append(outcome)
            if not outcome["ok"]:
                failure = outcome
                logger.warning(f"Step {index} ({step.op}) did not match its expectation: {outcome.get('code')}")
                break
        return {
            "protocol": self.script.protocol,
            "passed": failure is None,
            "steps": results,
            "failure": failure,
        }

    def _run_step(self, index: int, step: ScriptStep) -> dict:
        handler = getattr(self, f"op_{step.op}", None)
        if handler is None or not self._supports(step.op):
            raise ValidationException(f"step {index}: unknown op {step.op} for protocol {self.script.protocol}")
        record = {"step": index, "op": step.op}
        args = self.resolve(step.args)
        try:
            result = handler(**args)
        except TypeError as e:
            raise ValidationException(f"step {index} ({step.op}): bad arguments: {e}") from e
        except ScriptExpectationError as e:
            return {**record, "ok": False, "code": e.code, "error": e.message}
        except VBELabException as e:
            if step.expect == e.code:
                return {**record, "ok": True, "code": e.code}
            return {**record, "ok": False, "code": e.code, "error": e.message, "expected": step.expect}

        if step.expect is not None:
            return {**record, "ok": False, "code": None, "expected": step.expect, "result": result}
        if step.bind:
            self.variables[step.bind] = result
        return {**record, "ok": True, "result": result}

    BASIC_OPS = {"keygen", "tick", "sign", "register_bribe", "take_bribe", "sign_via_encumbered_key", "verify", "check"}

    def _supports(self, op: str) -> bool:
        if op == "check":
            return True
        return (op in self.BASIC_OPS) == (self.script.protocol == "basic")

    def op_check(self, value: Any, equals: Any) -> bool:
        if value != equals:
            raise ScriptExpectationError(f"expected {equals!r}, got {value!r}")
        return True

    # Basic protocol

    def op_keygen(self, party: str) -> str:
        return self.dao.keygen(party)

    def op_tick(self, steps: int = 1) -> int:
        return self.dao.tick(steps)

    def op_sign(self, party: str, pk: str, message: dict) -> str:
        return self.dao.sign(party, pk, _message(message))

    def op_register_bribe(self, briber: str, amount: float, restriction: dict, deposit: float) -> str:
        spec = RestrictionIn(**restriction)
        return self.dao.register_bribe(
            briber,
            amount,
            Restriction(
                kinds=frozenset(spec.kinds),
                proposals=frozenset(spec.proposals) if spec.proposals is not None else None,
            ),
            deposit,
        )

    def op_take_bribe(self, party: str, pk: str, bribe: str) -> float:
        return self.dao.take_bribe(party, pk, bribe)

    def op_sign_via_encumbered_key(self, briber: str, pk: str, message: dict, bribe: str) -> str:
        return self.dao.sign_via_encumbered_key(briber, pk, _message(message), bribe)

    def op_verify(self, pk: str, message: dict, signature: str) -> bool:
        return self.dao.verify(pk, _message(message), signature)

    # Lite protocol

    def _wallet(self, name: str) -> Wallet:
        if name not in self.wallets:
            raise NotFoundException(f"no wallet {name}")
        return self.wallets[name]

    def _address(self, name_or_address: str) -> str:
        return self.wallets[name_or_address].address if name_or_address in self.wallets else name_or_address

    def _include(self, tid: str) -> dict:
        block = self.ledger.produce_block([tid])
        status = self.ledger.status(tid)
        if status is not TxStatus.INCLUDED:
            reason = self.ledger.rejection_reason(tid) or status.value
            raise VBELabException(f"transaction {tid[:12]} {status.value}: {reason}", 400, code=reason)
        return {"tx": tid, "height": block.height}

    def op_deposit(self, wallet: str, amount: float, recipient: str | None = None) -> dict:
        address, encrypted = self.lite.get_deposit_address()
        self._encrypted[address] = encrypted
        included = self._include(self._wallet(wallet).transfer(self.lite.dao_asset, address, amount))
        authorization = self.lite.deposit_and_mint(
            InclusionProof(included["height"], included["tx"]),
            encrypted,
            self._address(recipient or wallet),
        )
        return {
            "address": address,
            **included,
            "authorization": authorization.to_dict() if authorization else None,
        }

    def op_register_deposit(self, address: str, tx: str, recipient: str) -> dict | None:
        if address not in self._encrypted:
            raise NotFoundException(f"no deposit address {address}")
        authorization = self.lite.deposit_and_mint(
            self.ledger.inclusion_proof(tx), self._encrypted[address], self._address(recipient)
        )
        return authorization.to_dict() if authorization else None

    def op_claim_mint(self, tx: str) -> dict:
        return self.lite.claim_mint_authorization(tx).to_dict()

    def op_mint(self, wallet: str, authorization: dict) -> dict:
        MintAuthorization(**authorization)
        return self._include(self._wallet(wallet).call(self.lite.token.name, "mint", authorization=authorization))

    def op_burn(self, wallet: str, amount: float) -> dict:
        return self._include(self._wallet(wallet).call(self.lite.token.name, "burn", amount=amount))

    def op_transfer(self, wallet: str, to: str, amount: float, asset: str | None = None) -> dict:
        return self._include(
            self._wallet(wallet).transfer(asset or self.lite.dao_asset, self._address(to), amount)
        )

    def op_redeem(self, burn: str, recipient: str) -> dict:
        request = self.lite.redeem_and_withdraw(self.ledger.inclusion_proof(burn), self._address(recipient))
        return _request_view(request)

    def op_submit(self, request: str) -> list:
        return self.lite.submit_request(self._request(request))

    def op_produce_block(self, ordering: list | None = None) -> dict:
        block = self.ledger.produce_block(ordering)
        return {"height": block.height, "included": list(block.tx_ids), "invalidated": list(block.invalidated)}

    def op_confirm(self, tx: str) -> dict:
        return _request_view(self.lite.confirm_withdrawal(self.ledger.inclusion_proof(tx)))

    def op_reissue(self, request: str) -> dict:
        return _request_view(self.lite.reissue_withdrawal(request))

    def op_advance(self, blocks: int = 1) -> int:
        self.ledger.advance(blocks)
        return self.ledger.height

    def op_status(self, tx: str) -> str:
        return self.ledger.status(tx).value

    def op_dd_balance(self, wallet: str) -> float:
        return self.lite.token.balance(self._address(wallet))

    def op_balance(self, wallet: str, asset: str | None = None) -> float:
        return self.ledger.balance(self._address(wallet), asset or self.lite.dao_asset)

    def op_auction_create(self, proposal: str, end: int, expiry: int) -> str:
        return self.lite.auction_create(proposal, end, expiry)

    def op_auction_bid(self, auction: str, bidder: str, amount: float) -> dict:
        proof = place_bid(self.lite, self._wallet(bidder), auction, amount)
        return {"tx": proof.tx_id, "height": proof.height}

    def op_auction_settle(self, auction: str) -> str | None:
        winner = self.lite.auction_settle(auction)
        return next((name for name, w in self.wallets.items() if w.address == winner), winner)

    def op_sign_votes(self, auction: str, party: str, vote: str) -> int:
        return len(self.lite.sign_votes_for_winner(auction, self._address(party), vote))

    def op_enumeration_attack(self, policy: str, budget: int, victims: int, lockup: int = 0) -> dict:
        return enumeration_attack(SelectionPolicy(policy), budget, victims, lockup, seed=self.seed).to_dict()

    def _request(self, request_id: str):
        if request_id not in self.lite.requests:
            raise NotFoundException(f"no withdrawal request {request_id}")
        return self.lite.requests[request_id]

    # Logs

    def public_log(self) -> list[dict]:
        if self.dao is not None:
            return list(self.dao.log.public)
        return self.ledger.events() + list(self.lite.log.public)

    def confidential_log(self) -> list[dict]:
        return list((self.dao or self.lite).log.confidential)


def _message(data: dict) -> Message:
    return Message(**MessageIn(**data).model_dump())


def _request_view(request) -> dict:
    return {
        "request": request.request_id,
        "amount": request.amount,
        "revenue_share": request.revenue_share,
        "completed": request.completed,
        "parts": [
            {"address": p.address, "amount": p.amount, "nonce": p.nonce, "tx": p.tx_id, "confirmed": p.confirmed}
            for p in request.parts
        ],
    }


def run_script(script: DarkDaoScript, seed: int | None = None) -> tuple[dict, list[dict], list[dict]]:
    """Run a script; returns (report, public events, confidential events)"""
    runner = ScriptRunner(script, seed)
    report = runner.run()
    report["seed"] = runner.seed
    return report, runner.public_log(), runner.confidential_log()
