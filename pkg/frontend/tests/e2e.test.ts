// End-to-end flows against a live daemon. The suite boots
// `python3 -m webprover.daemon` on an ephemeral port with a throwaway
// store, drives it through the Client exactly as the browser code does,
// and checks the locked-region and disambiguation laws against real
// responses.

import { ChildProcess, spawn } from 'node:child_process'
import { mkdtempSync, rmSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'
import { Client } from '../src/client'
import {
  UiState,
  applyExecuted,
  applyUndo,
  initialState,
  lockedText,
  resolveChoice,
} from '../src/uistate'

const PORT = 8090 + (process.pid % 1000)
const BASE = `http://127.0.0.1:${PORT}`
// vitest runs with cwd = frontend/
const repoRoot = join(process.cwd(), '..')

let daemon: ChildProcess
let storeDir: string

async function waitForDaemon(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const response = await fetch(`${BASE}/matita/goals`, { method: 'GET' })
      if (response.status > 0) return
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 100))
    }
  }
  throw new Error('daemon did not come up')
}

beforeAll(async () => {
  storeDir = mkdtempSync(join(tmpdir(), 'webprover-e2e-'))
  daemon = spawn(
    'python3',
    ['-m', 'webprover.daemon', '--port', String(PORT), '--store', storeDir],
    {
      cwd: repoRoot,
      env: { ...process.env, PYTHONPATH: join(repoRoot, 'src') },
      stdio: ['ignore', 'pipe', 'pipe'],
    },
  )
  await waitForDaemon()
}, 30000)

afterAll(() => {
  daemon?.kill()
  if (storeDir) rmSync(storeDir, { recursive: true, force: true })
})

async function loggedIn(user: string): Promise<Client> {
  const client = new Client(BASE)
  await client.register(user, 'hunter2hunter2')
  await client.login(user, 'hunter2hunter2')
  await client.newSession()
  return client
}

// Drive one execute through the UiState transitions the browser uses.
async function step(
  client: Client,
  state: UiState,
  mode: 'one' | 'all',
): Promise<UiState> {
  const view = await client.execute(state.remainder, mode)
  return applyExecuted(
    state, view.consumed, view.statements, view.goals, view.choices ?? null)
}

describe('locked-region law against the live daemon', () => {
  it('locks exactly the acknowledged enriched statements and undoes them',
    async () => {
      const client = await loggedIn('erin')
      const script =
        'theorem tfour : pa → pb → pa ∧ pb.\nintro H.\nauto.\nqed.\n'
      let state = initialState(script)
      const acknowledged: string[] = []

      for (let i = 0; i < 4; i++) {
        state = await step(client, state, 'one')
        acknowledged.push(...state.lockedStatements.slice(acknowledged.length))
        expect(lockedText(state)).toBe(acknowledged.join(''))
      }
      // only the newline after the final "qed." is left unconsumed
      expect(state.remainder).toBe('\n')
      expect(state.goals).toEqual([])
      // the bare auto came back enriched with a trace span
      expect(lockedText(state)).toContain('auto<T>')

      // undo one: the last enriched statement moves back into the remainder
      let view = await client.undo(1)
      state = applyUndo(state, view.steps, view.goals)
      expect(lockedText(state)).toBe(acknowledged.slice(0, 3).join(''))
      expect(state.remainder).toBe(acknowledged[3] + '\n')

      // undo all: locked region empties, text is fully editable again
      view = await client.undo('all')
      state = applyUndo(state, view.steps, view.goals)
      expect(lockedText(state)).toBe('')
      expect(state.remainder).toBe(acknowledged.join('') + '\n')
    }, 30000)
})

describe('disambiguation dialog against the live daemon', () => {
  it('inserted markup makes the re-run succeed with no dialog', async () => {
    const client = await loggedIn('frank')
    const script =
      'theorem amb : swapped → swapped.\nintro H.\nexact H.\nqed.\n'
    let state = initialState(script)

    state = await step(client, state, 'all')
    expect(state.pendingChoices).not.toBeNull()
    expect(state.pendingChoices?.lexeme).toBe('swapped')
    expect(state.pendingChoices!.candidates.length).toBeGreaterThanOrEqual(2)

    // pick one interpretation, re-issue, and keep answering until the
    // dialog stops coming (second occurrence may ask again)
    const pick = state.pendingChoices!.candidates[0].uri
    for (let i = 0; i < 10 && state.pendingChoices; i++) {
      state = resolveChoice(state, pick)
      expect(state.remainder).toContain(`<A href="${pick}">swapped</A>`)
      state = await step(client, state, 'all')
    }
    expect(state.pendingChoices).toBeNull()
    expect(state.remainder).toBe('\n')
    expect(state.goals).toEqual([])

    // a fresh session accepts the fully enriched script in one shot
    const rerun = new Client(BASE)
    await rerun.login('frank', 'hunter2hunter2')
    await rerun.newSession()
    let fresh = initialState(lockedText(state))
    fresh = await step(rerun, fresh, 'all')
    expect(fresh.pendingChoices).toBeNull()
    expect(fresh.remainder.trim()).toBe('')
    expect(fresh.goals).toEqual([])
  }, 30000)
})
