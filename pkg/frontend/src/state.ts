// The single view state shared by the map and the table. Selection,
// sort order, and search deliberately live outside the per-subject data
// so they survive subject switches and make cross-subject comparison of
// the same institutions possible.

export type SortColumn = 'name' | 'country' | 'papers' | 'probability';
export type SortDirection = 'asc' | 'desc';

export interface Viewport {
    lat: number;
    lon: number;
    zoom: number;
}

export interface ViewState {
    subject: string;
    sortColumn: SortColumn;
    sortDirection: SortDirection;
    search: string;
    onlySignificant: boolean;
    selection: string[];
    viewport: Viewport;
}

export const DEFAULT_VIEWPORT: Viewport = { lat: 30, lon: 0, zoom: 2 };

const DEFAULT_DIRECTION: Record<SortColumn, SortDirection> = {
    name: 'asc',
    country: 'asc',
    papers: 'desc',
    probability: 'desc',
};

export function initialState(subject: string): ViewState {
    return {
        subject,
        sortColumn: 'probability',
        sortDirection: 'desc',
        search: '',
        onlySignificant: false,
        selection: [],
        viewport: { ...DEFAULT_VIEWPORT },
    };
}

/** Change subject only; everything the user arranged is retained. */
export function switchSubject(state: ViewState, subject: string): ViewState {
    return { ...state, subject };
}

/** Clicking a header: same column toggles direction, new column resets it. */
export function toggleSort(state: ViewState, column: SortColumn): ViewState {
    if (state.sortColumn === column) {
        const sortDirection = state.sortDirection === 'asc' ? 'desc' : 'asc';
        return { ...state, sortDirection };
    }
    return { ...state, sortColumn: column, sortDirection: DEFAULT_DIRECTION[column] };
}

export function toggleSelection(state: ViewState, institutionId: string): ViewState {
    const selection = state.selection.includes(institutionId)
        ? state.selection.filter((id) => id !== institutionId)
        : [...state.selection, institutionId];
    return { ...state, selection };
}

export function clearSelection(state: ViewState): ViewState {
    return { ...state, selection: [] };
}

export function setSearch(state: ViewState, search: string): ViewState {
    return { ...state, search };
}

export function setOnlySignificant(state: ViewState, on: boolean): ViewState {
    return { ...state, onlySignificant: on };
}

export function setViewport(state: ViewState, viewport: Viewport): ViewState {
    return { ...state, viewport };
}

// URL hash encoding, so views are shareable links. Format (documented in
// the repo README): #s=<subject>&o=<column>.<direction>&q=<search>
// &f=1&i=<id1,id2>&v=<lat>,<lon>,<zoom> — every field optional.

export function encodeHash(state: ViewState): string {
    const params = new URLSearchParams();
    params.set('s', state.subject);
    params.set('o', `${state.sortColumn}.${state.sortDirection}`);
    if (state.search) params.set('q', state.search);
    if (state.onlySignificant) params.set('f', '1');
    if (state.selection.length > 0) params.set('i', state.selection.join(','));
    const { lat, lon, zoom } = state.viewport;
    params.set('v', `${lat.toFixed(4)},${lon.toFixed(4)},${zoom}`);
    return '#' + params.toString();
}

const SORT_COLUMNS: SortColumn[] = ['name', 'country', 'papers', 'probability'];

export function decodeHash(hash: string, fallbackSubject: string): ViewState {
    const state = initialState(fallbackSubject);
    const raw = hash.startsWith('#') ? hash.slice(1) : hash;
    if (!raw) return state;
    const params = new URLSearchParams(raw);
    const subject = params.get('s');
    if (subject) state.subject = subject;
    const order = params.get('o');
    if (order) {
        const [column, direction] = order.split('.');
        if (SORT_COLUMNS.includes(column as SortColumn)) {
            state.sortColumn = column as SortColumn;
        }
        if (direction === 'asc' || direction === 'desc') {
            state.sortDirection = direction;
        }
    }
    state.search = params.get('q') ?? '';
    state.onlySignificant = params.get('f') === '1';
    const ids = params.get('i');
    if (ids) state.selection = ids.split(',').filter((id) => id.length > 0);
    const viewport = params.get('v');
    if (viewport) {
        const [lat, lon, zoom] = viewport.split(',').map(Number);
        if ([lat, lon, zoom].every(Number.isFinite)) {
            state.viewport = { lat, lon, zoom };
        }
    }
    return state;
}
