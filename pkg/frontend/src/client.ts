// Thin fetch wrapper over the daemon's HTTP endpoints. Every method
// returns the parsed XML view; no retry or queueing here, the UI's busy
// flag guarantees at most one request in flight.

import {
  ExecuteView,
  GoalView,
  UndoView,
  child,
  childAll,
  parseXml,
  readError,
  readExecute,
  readGoals,
  readUndo,
} from './xml'

export class ProtocolError extends Error {
  constructor(readonly code: string, message: string) {
    super(message)
  }
}

export class Client {
  token = ''
  session = ''

  constructor(readonly base: string) {}

  private url(path: string, params: Record<string, string>): string {
    const query = new URLSearchParams(params).toString()
    return `${this.base}${path}${query ? '?' + query : ''}`
  }

  private async call(
    method: 'GET' | 'POST',
    path: string,
    params: Record<string, string>,
    body?: string,
  ): Promise<string> {
    const response = await fetch(this.url(path, params), { method, body })
    return response.text()
  }

  private checkError(body: string): void {
    const err = readError(parseXml(body))
    if (err) throw new ProtocolError(err.code, err.message)
  }

  async register(user: string, password: string): Promise<void> {
    const body = await this.call('POST', '/matita/register', {
      user,
      password,
    })
    this.checkError(body)
  }

  async login(user: string, password: string): Promise<void> {
    const body = await this.call('POST', '/matita/login', { user, password })
    this.checkError(body)
    const token = child(parseXml(body), 'token')
    this.token = token?.attrs['value'] ?? ''
  }

  async logout(): Promise<void> {
    await this.call('POST', '/matita/logout', { token: this.token })
    this.token = ''
    this.session = ''
  }

  async newSession(): Promise<string> {
    const body = await this.call('POST', '/matita/session/new', {
      token: this.token,
    })
    this.checkError(body)
    this.session = child(parseXml(body), 'session')?.attrs['id'] ?? ''
    return this.session
  }

  // Execute errors are part of the normal result (inline markers), so only
  // transport-level codes are thrown here.
  async execute(script: string, mode: 'one' | 'all'): Promise<ExecuteView> {
    const body = await this.call(
      'POST',
      '/matita/execute',
      { token: this.token, session: this.session, mode },
      script,
    )
    const view = readExecute(body)
    if (view.error && ['auth', 'busy', 'notfound'].includes(view.error.code)) {
      throw new ProtocolError(view.error.code, view.error.message)
    }
    return view
  }

  async undo(steps: number | 'all'): Promise<UndoView> {
    const body = await this.call('POST', '/matita/undo', {
      token: this.token,
      session: this.session,
      steps: String(steps),
    })
    this.checkError(body)
    return readUndo(body)
  }

  async goals(): Promise<GoalView[]> {
    const body = await this.call('GET', '/matita/goals', {
      token: this.token,
      session: this.session,
    })
    this.checkError(body)
    return readGoals(parseXml(body))
  }

  async ls(path: string): Promise<{ name: string; kind: string }[]> {
    const body = await this.call('GET', '/matita/ls', {
      token: this.token,
      path,
    })
    this.checkError(body)
    const listing = child(parseXml(body), 'listing')
    if (!listing) return []
    return childAll(listing, 'entry').map((e) => ({
      name: e.attrs['name'],
      kind: e.attrs['kind'],
    }))
  }

  async read(file: string): Promise<string> {
    const body = await this.call('GET', '/matita/read', {
      token: this.token,
      file,
    })
    this.checkError(body)
    return child(parseXml(body), 'file')?.text ?? ''
  }

  async save(file: string, content: string): Promise<void> {
    const body = await this.call(
      'POST',
      '/matita/save',
      { token: this.token, file },
      content,
    )
    this.checkError(body)
  }
}
